#pragma once

// Umbrella header: the whole toolkit in one include.

#include "evolveq/catalog.hpp"
#include "evolveq/check_config.hpp"
#include "evolveq/errors.hpp"
#include "evolveq/family_io.hpp"
#include "evolveq/grid.hpp"
#include "evolveq/lemma.hpp"
#include "evolveq/linalg.hpp"
#include "evolveq/operator_family.hpp"
#include "evolveq/parallel.hpp"
#include "evolveq/propagator.hpp"
#include "evolveq/regularity.hpp"
#include "evolveq/reports.hpp"
#include "evolveq/sampled_path.hpp"
#include "evolveq/scalar_function.hpp"
#include "evolveq/version.hpp"
