function f(x) {
  switch (x) {
    case 1: return "one";
    default: return "many";
  }
}
f(2);