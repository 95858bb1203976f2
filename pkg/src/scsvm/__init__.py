"""scsvm - linear SVM training under sign constraints on the weights."""
