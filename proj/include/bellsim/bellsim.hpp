#pragma once

#include "bellsim/bell.hpp"
#include "bellsim/detection.hpp"
#include "bellsim/error.hpp"
#include "bellsim/fock.hpp"
#include "bellsim/montecarlo.hpp"
#include "bellsim/optics.hpp"
#include "bellsim/optimize.hpp"
