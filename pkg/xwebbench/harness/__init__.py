# Benchmark protocol: load test, cold and warm runs, statistics, verification, reports
