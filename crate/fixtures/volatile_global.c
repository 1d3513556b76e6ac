// rename: v w
// expect: refused variable is volatile
volatile int v = 0;
int main(void) {
  v = v + 1;
  return v;
}
