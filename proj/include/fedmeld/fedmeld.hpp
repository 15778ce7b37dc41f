#pragma once

#include "fedmeld/baselines.hpp"
#include "fedmeld/bisection.hpp"
#include "fedmeld/dataset.hpp"
#include "fedmeld/dispersal.hpp"
#include "fedmeld/errors.hpp"
#include "fedmeld/gamma_estimate.hpp"
#include "fedmeld/geometry.hpp"
#include "fedmeld/linkmodel.hpp"
#include "fedmeld/model_vector.hpp"
#include "fedmeld/models.hpp"
#include "fedmeld/partition.hpp"
#include "fedmeld/rng.hpp"
#include "fedmeld/schedule.hpp"
#include "fedmeld/scmr.hpp"
#include "fedmeld/simulation.hpp"
#include "fedmeld/training.hpp"
