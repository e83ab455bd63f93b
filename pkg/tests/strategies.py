"""Hypothesis strategies for random models."""

from hypothesis import strategies as st

from cmsbridge.metamodel import (
    EXTENDABLE_KINDS,
    AttributeType,
    CmsAttribute,
    CmsClass,
    CmsRelationship,
    Multiplicity,
    Platform,
    core_model,
)

identifiers = st.from_regex(r"[a-z][A-Za-z0-9_]{0,12}", fullmatch=True).filter(lambda s: s != "id")
class_names = st.from_regex(r"[A-Z][A-Za-z0-9]{0,12}", fullmatch=True)
texts = st.text(st.characters(blacklist_categories=("Cs",)), max_size=20)


@st.composite
def models(draw, max_classes=8):
    base = core_model(
        draw(texts), draw(texts), draw(texts), draw(st.sampled_from(list(Platform))))
    names = draw(st.lists(class_names.filter(lambda n: n not in base), unique=True,
                          max_size=max_classes))
    targets = base.names + names
    classes = []
    for name in names:
        attrs = draw(st.lists(identifiers, unique=True, max_size=6))
        rels = draw(st.lists(identifiers, unique=True, max_size=4))
        classes.append(CmsClass(
            name,
            draw(st.sampled_from(sorted(EXTENDABLE_KINDS))),
            False,
            draw(st.none() | texts),
            tuple(CmsAttribute(a, draw(st.sampled_from(list(AttributeType)))) for a in attrs),
            tuple(CmsRelationship(r, draw(st.sampled_from(targets)),
                                  draw(st.sampled_from(list(Multiplicity))),
                                  draw(st.none() | texts)) for r in rels),
        ))
    return base.replace(classes=base.classes + tuple(classes))
