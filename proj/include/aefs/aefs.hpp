#pragma once

#include "aefs/baselines.hpp"
#include "aefs/cli.hpp"
#include "aefs/error.hpp"
#include "aefs/eval.hpp"
#include "aefs/io.hpp"
#include "aefs/model.hpp"
#include "aefs/numerics.hpp"
#include "aefs/prox.hpp"
#include "aefs/selector.hpp"
#include "aefs/sweep.hpp"
