# Query workload: declarative specs, block gating, XQuery rendering
