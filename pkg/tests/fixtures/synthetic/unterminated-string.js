console.log("oops);
console.log(1);