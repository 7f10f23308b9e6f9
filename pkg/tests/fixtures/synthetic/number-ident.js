var x = 3px;