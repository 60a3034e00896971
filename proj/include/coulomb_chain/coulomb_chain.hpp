#pragma once

#include "coulomb_chain/analysis.hpp"
#include "coulomb_chain/closed_form.hpp"
#include "coulomb_chain/errors.hpp"
#include "coulomb_chain/force_profile.hpp"
#include "coulomb_chain/model.hpp"
#include "coulomb_chain/oracle.hpp"
#include "coulomb_chain/shooting.hpp"
