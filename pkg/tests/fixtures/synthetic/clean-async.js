async function main() {
  const res = await Promise.resolve(1);
  return res;
}
main().then(console.log);