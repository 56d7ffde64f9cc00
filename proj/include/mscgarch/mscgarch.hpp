#pragma once

#include "mscgarch/error.hpp"
#include "mscgarch/rng.hpp"
#include "mscgarch/markov.hpp"
#include "mscgarch/model.hpp"
#include "mscgarch/filter.hpp"
#include "mscgarch/stability.hpp"
#include "mscgarch/bayes.hpp"
#include "mscgarch/evaluation.hpp"
#include "mscgarch/stats.hpp"
#include "mscgarch/io.hpp"
