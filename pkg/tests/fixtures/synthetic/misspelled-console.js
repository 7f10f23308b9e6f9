conosle.log("hi");