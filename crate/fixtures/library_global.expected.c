int b = 0;
int main(void) {
  b = 1;
  blackbox();
  return b;
}
