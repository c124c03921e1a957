#pragma once

// Stratified incomplete local simplex (SILS) concavity tests.

#include "sils/bigcount.hpp"
#include "sils/bootstrap.hpp"
#include "sils/config.hpp"
#include "sils/dataset.hpp"
#include "sils/errors.hpp"
#include "sils/jackknife.hpp"
#include "sils/localize.hpp"
#include "sils/oracle.hpp"
#include "sils/parallel.hpp"
#include "sils/rng.hpp"
#include "sils/run.hpp"
#include "sils/sampling.hpp"
#include "sils/simgen.hpp"
#include "sils/simplex.hpp"
#include "sils/statistic.hpp"
#include "sils/version.hpp"
