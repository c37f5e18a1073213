#pragma once

#include "polarvlsi/bounds.hpp"
#include "polarvlsi/decoding_graph.hpp"
#include "polarvlsi/gf2.hpp"
#include "polarvlsi/mesh.hpp"
#include "polarvlsi/polar_code.hpp"
#include "polarvlsi/rng.hpp"
