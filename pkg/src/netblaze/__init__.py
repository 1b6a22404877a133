"""Front propagation and junction blocking on metric networks."""
