from rest_framework import serializers

from isingldpc.defaults import default_seed, setting
from .models import SaConfig


class SaConfigSerializer(serializers.Serializer):
    sweeps = serializers.IntegerField(min_value=1, default=setting('SA_SWEEPS'))
    num_anneals = serializers.IntegerField(min_value=1, default=setting('SA_NUM_ANNEALS'))
    beta_start = serializers.FloatField(default=setting('SA_BETA_START'))
    beta_end = serializers.FloatField(default=setting('SA_BETA_END'))
    seed = serializers.IntegerField(min_value=0, allow_null=True, default=default_seed)

    def validate(self, data):
        if not 0 < data['beta_start'] <= data['beta_end']:
            raise serializers.ValidationError("Need 0 < beta_start <= beta_end")
        return data

    def create(self, validated_data):
        return SaConfig(**validated_data)
