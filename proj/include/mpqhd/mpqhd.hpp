#pragma once
// Umbrella header.

#include "configspace.hpp"
#include "stencil.hpp"
#include "fields.hpp"
#include "hydrofields.hpp"
#include "tensors.hpp"
#include "balance.hpp"
#include "cylindrical.hpp"
#include "scenarios.hpp"
#include "suite.hpp"
#include "io.hpp"
#include "config.hpp"
#include "run.hpp"
