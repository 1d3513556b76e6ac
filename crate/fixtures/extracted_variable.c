// behaviors: 1
int main(){
  int r1 = printf("A") ;
  int r2 = printf("B") ;
  return r1 + r2 ;
  }
