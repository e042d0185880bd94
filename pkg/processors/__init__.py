# Processors module