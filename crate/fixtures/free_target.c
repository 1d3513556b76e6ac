// rename: x y
// expect: refused Replacing identifier occurring in function.
int x;

int f(int x){
  return y ;
}
