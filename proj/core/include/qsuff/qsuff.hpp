#pragma once

#include "qsuff/algebra.hpp"
#include "qsuff/channel.hpp"
#include "qsuff/divergences.hpp"
#include "qsuff/errors.hpp"
#include "qsuff/expfam.hpp"
#include "qsuff/matrix.hpp"
#include "qsuff/random.hpp"
#include "qsuff/ssa.hpp"
#include "qsuff/states.hpp"
#include "qsuff/sufficiency.hpp"
