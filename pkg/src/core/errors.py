class BssdError(Exception):
    """Base class for all toolkit errors"""


class ConfigError(BssdError):
    pass


class InvariantViolation(BssdError):
    """A domain type was constructed with content that breaks one of its rules"""

    def __init__(self, rule: str, message: str, element_id: str = ""):
        self.rule = rule
        self.element_id = element_id
        self.message = message
        where = f" [{element_id}]" if element_id else ""
        super().__init__(f"{rule}{where}: {message}")

    def with_element(self, element_id: str) -> 'InvariantViolation':
        if self.element_id:
            return self
        return InvariantViolation(self.rule, self.message, element_id)


class MissingDirectionError(BssdError):
    def __init__(self, space_id: str, direction: str):
        self.space_id = space_id
        self.direction = direction
        super().__init__(f"behavior space {space_id} has no {direction} behavior")


class UnknownElementError(BssdError):
    def __init__(self, kind: str, element_id: str):
        self.kind = kind
        self.element_id = element_id
        super().__init__(f"unknown_{kind}: {element_id}")


class AlreadyCoveredError(BssdError):
    def __init__(self, lanelet_id: str, space_id: str):
        self.lanelet_id = lanelet_id
        self.space_id = space_id
        super().__init__(f"lanelet {lanelet_id} is already covered by behavior space {space_id}")


class MalformedXmlError(BssdError):
    pass


class DuplicateIdError(BssdError):
    def __init__(self, element_type: str, element_id: str):
        self.element_type = element_type
        self.element_id = element_id
        super().__init__(f"duplicate {element_type} id {element_id}")


class UnknownRoleError(BssdError):
    def __init__(self, relation_id: str, role: str):
        self.relation_id = relation_id
        self.role = role
        super().__init__(f"relation {relation_id} has unknown mandatory role {role!r}")


class InvalidCutError(BssdError):
    pass


class SpecSyntaxError(BssdError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class NonAdjacentStepsError(BssdError):
    def __init__(self, source: str, target: str):
        self.source = source
        self.target = target
        super().__init__(f"non_adjacent_steps: no edge from {source} to {target}")
