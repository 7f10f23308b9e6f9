function* gen() { yield 1; yield 2; }
for (const v of gen()) console.log(v);