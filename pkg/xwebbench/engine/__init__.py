# Reference query evaluation and its brute-force oracle
