"""From-scratch learners, encodings and metrics."""
