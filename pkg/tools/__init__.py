# Tools module
