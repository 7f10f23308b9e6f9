http.get(url, function(res) {
    var data = '';
    res.on('data',function(chunk){data+= chunk;});
    res.on('end',function(){
        console.log("BODY: " + data);})
}).on('error', function(e) {
    console.log("Got error: " + e.message);});
};