# Keys of the independent random streams derived from a run seed
STREAM_FEATURES = 1
STREAM_THETA = 2
STREAM_NOISE = 3
STREAM_SGD = 4
STREAM_SPLIT = 5
STREAM_CENTROIDS = 6
STREAM_THOMPSON = 7
STREAM_DATA = 8
