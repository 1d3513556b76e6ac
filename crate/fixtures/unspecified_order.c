// behaviors: 2
int main(){


  return printf("A") + printf("B");
  }
