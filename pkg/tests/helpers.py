from xrorch.model import Interaction, Perception, ResourceVector, Role, UserProfile


def make_user(uid="UE1", kind="participant", attachment=None, **kw):
    presets = {
        "participant": (Role.PARTICIPANT, Interaction.N_TO_M, Perception.POINT_CLOUD, "QP1", 300.0,
                        ResourceVector(8, 0.5)),
        "producer": (Role.PRODUCER, Interaction.ONE_TO_N, Perception.AVATAR_3D, "QP2", 100.0,
                     ResourceVector(5, 0.3)),
        "audience": (Role.AUDIENCE, Interaction.NONE, Perception.NONE, "QP3", 70.0, ResourceVector(1, 0.1)),
    }
    role, inter, perc, qp, l_proc, usage = presets[kind]
    args = dict(id=uid, role=role, interaction=inter, self_perception=perc, quality_profile=qp,
                l_max=500.0, l_proc=l_proc, r_usage=usage, attachment=attachment or uid)
    args.update(kw)
    return UserProfile(**args)
