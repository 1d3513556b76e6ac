// rename: x y
// expect: refused This renaming would introduce an undesired shadowing.
int x ;
int f(int y){
  return y + x ;
}
