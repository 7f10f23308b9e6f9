doSomething(1, 2);
console.log("after");