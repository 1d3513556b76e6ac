int y;
int f(int y) {
  return y + 1;
}
