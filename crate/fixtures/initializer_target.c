// rename: x y
// expect: refused replacing identifier already occurs
int x = y + 1;
int y = 2;
