fs.writeFileSync("out.txt", data);