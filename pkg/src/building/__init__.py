# building package
