#
# Copyright 2024 European Centre for Medium-Range Weather Forecasts (ECMWF)
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
# In applying this licence, ECMWF does not waive the privileges and immunities
# granted to it by virtue of its status as an intergovernmental organisation nor
# does it submit to any jurisdiction.
#

class FinolaError(Exception):
    """Baseclass for errors surfaced to the command line."""

    exit_code = 1
    description = None

    def __init__(self, description=None):
        super().__init__(description)
        if description is not None:
            self.description = description

    def __str__(self):
        return self.description or self.__class__.__name__


class UsageError(FinolaError):
    exit_code = 2


class InvalidConfig(UsageError):
    pass


class DataError(FinolaError):
    exit_code = 3


class ShapeMismatch(DataError):
    pass


class PositionOutOfRange(DataError):
    pass


class EmptyMask(DataError):
    pass


class MalformedHeader(DataError):
    pass


class TruncatedPayload(DataError):
    pass


class CheckpointError(DataError):
    pass


class NumericalError(FinolaError):
    exit_code = 4


class Singular(NumericalError):
    pass


class Defective(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class ZeroBeta(NumericalError):
    pass


class GraphNotEvaluated(NumericalError):
    pass


class GradientMismatch(NumericalError):
    pass
