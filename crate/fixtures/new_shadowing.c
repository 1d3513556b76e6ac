// rename: x y
// expect: renamed
int x ;
int f(int y){
  return y + 1 ;
}
