#include "tri3/triangulation.hpp"
