#include <pybind11/pybind11.h>
PYBIND11_MODULE(osvol, m) { m.doc() = "stub"; }
