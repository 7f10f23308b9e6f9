var words = s.split(" ");