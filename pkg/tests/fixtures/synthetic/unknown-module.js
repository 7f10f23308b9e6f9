const lib = require("some-unknown-lib");
lib.doAnything().then(x => x.y);