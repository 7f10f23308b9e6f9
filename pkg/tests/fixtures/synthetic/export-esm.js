export function hello() {
  return "hi";
}