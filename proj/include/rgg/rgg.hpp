#pragma once

#include "rgg/cleanup.hpp"
#include "rgg/cycle_builder.hpp"
#include "rgg/dissection.hpp"
#include "rgg/errors.hpp"
#include "rgg/exact_oracles.hpp"
#include "rgg/experiments.hpp"
#include "rgg/geometry.hpp"
#include "rgg/graph.hpp"
#include "rgg/hitting_radii.hpp"
#include "rgg/instances.hpp"
#include "rgg/io.hpp"
#include "rgg/pancyclic.hpp"
#include "rgg/reference.hpp"
#include "rgg/rng.hpp"
#include "rgg/spanning_tree.hpp"
