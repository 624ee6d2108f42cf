import dataclasses
import enum
import json
from dataclasses import dataclass

import numpy as np


class EnhancedJSONEncoder(json.JSONEncoder):
    def default(self, o):
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)
        if isinstance(o, enum.Enum):
            return o.name
        if isinstance(o, complex):
            return {"re": o.real, "im": o.imag}
        if isinstance(o, np.generic):
            return self.default(o.item()) if isinstance(o, np.complexfloating) else o.item()
        if isinstance(o, np.ndarray):
            return [self.default(v) if np.iscomplexobj(o) else v for v in o.tolist()]
        return super().default(o)


@dataclass
class OneAtomData:
    """Base for report records; prints itself as JSON"""

    def to_dict(self) -> dict:
        return json.loads(json.dumps(self, cls=EnhancedJSONEncoder))

    def __str__(self):
        return json.dumps(self, cls=EnhancedJSONEncoder)
