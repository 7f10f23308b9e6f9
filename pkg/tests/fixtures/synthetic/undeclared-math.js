var biggest = Math.max(count, 10);
console.log(biggest);