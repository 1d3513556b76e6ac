// The library function reads `a` directly, so the rename breaks the link.
// rename: a b
// expect: renamed
// extcall: blackbox:reads_global(a)
// diff: diverges
int a = 0;

int main(void) {
  a = 1;
  blackbox();
  return a;
}
