# Tests for popaug
