console.log(later());
function later() { return helper; }
var helper = 1;