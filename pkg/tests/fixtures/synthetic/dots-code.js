app.use(express.static("public"));
...
app.listen(3000);