"""Integer codes shared by both kernel backends."""

# Delta profile codes used by the hedge kernel
CODE_CALL = 0
CODE_PUT = 1
CODE_SYNTH_CALL = 2
CODE_SYNTH_PUT = 3
CODE_FORWARD_STATIC = 4
CODE_FORWARD_MART = 5
CODE_NET_DELTA = 6

# Terminal target codes
TARGET_CALL = 0
TARGET_PUT = 1
TARGET_FORWARD = 2
TARGET_CONST = 3
