#include <catch2/catch_amalgamated.hpp>
#include "sils/sils.hpp"
