// rename: x y
// expect: refused This renaming would introduce an undesired shadowing.
int x = 1 ;

void main(void){
  x++ ;
  {
    int y = 1 ;
    y++ ;
  }
}
