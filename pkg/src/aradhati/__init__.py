"""Arabic subjectivity toolkit."""
