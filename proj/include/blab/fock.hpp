#pragma once

#include "blab/fock/modes.hpp"
#include "blab/fock/operators.hpp"
#include "blab/fock/series.hpp"
#include "blab/fock/space.hpp"
#include "blab/fock/verify.hpp"
