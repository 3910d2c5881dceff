# Source module
